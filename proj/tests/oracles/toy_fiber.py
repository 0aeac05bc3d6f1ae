"""Brute-force fiber maximum of J(t e1 + c e2) = t^2/2 - (t^2 + c^2)^2/4."""
import numpy as np

t = np.linspace(0.0, 3.0, 3001)
c = np.linspace(-3.0, 3.0, 6001)
T, C = np.meshgrid(t, c, indexing="ij")
J = 0.5 * T**2 - 0.25 * (T**2 + C**2) ** 2
k = np.unravel_index(np.argmax(J), J.shape)
print(f"max J = {J[k]:.15f} at t = {T[k]:.6f}, c = {C[k]:.6f}")
