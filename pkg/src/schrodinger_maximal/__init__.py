"""Numerical laboratory for blow-up of the Schrodinger maximal function.

Builds a band-limited initial datum whose free evolution concentrates near
rational points of a torus, evaluates e^{it Laplacian} f exactly by tensorized
quadrature, and measures how sup_t |e^{it Laplacian} f| / ||f||_2 grows with
the frequency scale R.
"""

__version__ = "0.1.0"
