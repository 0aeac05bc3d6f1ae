"""Closed-form bound evaluations used as frozen test values."""
import math

p = 6.0
e = p / (p - 2.0)
print(f"upper(p=6, lambda+lambda_nu=1, mu=pi) = {(0.5 - 1/p) * 1.0**e * math.pi:.16f}")
print(f"lower(p=6, S=1) = {(0.5 - 1/p) * 1.0**e:.16f}")
