"""Tests package for distillkit."""

# This file makes the tests directory a proper Python package
# and prevents Ruff from treating it as an implicit namespace package
