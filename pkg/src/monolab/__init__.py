"""Exact variational-analysis toolkit for piecewise-affine operators and piecewise-quadratic functions."""
