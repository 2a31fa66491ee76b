"""bcov-kit: lattice invariants, modular/theta special functions,
Borcherds products, orbifold Euler characteristics, and flat-torus
spectral identities, assembled into the closed-form right-hand sides of
the torsion invariants of Borcea-Voisin threefolds."""

__version__ = "0.1.0"
