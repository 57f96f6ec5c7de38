"""Reference images of qh^2*ph^2 under the five marginal kernels.

Each entry holds the textbook form (as a parser-readable string) and the
canonical rendering the engine must reproduce byte for byte.
"""

OPERATOR = "qh^2*ph^2"

ROWS = (
    ("weyl", "p^2*q^2 + 2*i*hbar*p*q - 1/2*hbar^2",
     "q^2*p^2 + (2*i)*hbar^1*q^1*p^1 + (-1/2)*hbar^2"),
    ("cos", "p^2*q^2 + 2*i*hbar*p*q",
     "q^2*p^2 + (2*i)*hbar^1*q^1*p^1"),
    ("sinc", "p^2*q^2 + 2*i*hbar*p*q - 1/3*hbar^2",
     "q^2*p^2 + (2*i)*hbar^1*q^1*p^1 + (-1/3)*hbar^2"),
    ("standard", "p^2*q^2",
     "q^2*p^2"),
    ("antistandard", "p^2*q^2 + 4*i*hbar*p*q - 2*hbar^2",
     "q^2*p^2 + (4*i)*hbar^1*q^1*p^1 + (-2)*hbar^2"),
)
