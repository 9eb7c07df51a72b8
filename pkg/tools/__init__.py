"""Development tooling for stein-poisson (doit tasks)."""
