"""
Graph spectra and cospectrality toolkit.
"""

__version__ = "1.0.0"
__author__ = "Your Name"
__description__ = "Exact brute-force cospectrality of small graphs, with spectral distances and theorem checks"
