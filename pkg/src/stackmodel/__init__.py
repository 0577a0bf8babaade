"""Dependent type checking, groupoid semantics and forcing over stacks on small sites."""
