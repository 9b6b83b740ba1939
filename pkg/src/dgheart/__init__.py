"""Exact computations with perfect dg modules over positively graded dg algebras."""
