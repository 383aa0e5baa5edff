"""Graded homological algebra over quotients of F_p[x1..xn]."""
