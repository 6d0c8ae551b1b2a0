"""Development scripts for auditing and sweeping distillation runs."""
