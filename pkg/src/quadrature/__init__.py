"""Double-exponential quadrature of the singular period integrals."""
