"""Relativistic quantum bit commitment over a noisy channel: a simulator.

Modules
-------
siggrid   uniform tau-grid amplitudes, windows, inner products
states    double-hump packets and polarizations
channel   spectral channel instrument, validation, application
measure   windowed and optimal polarization measurements, perp statistics
coding    block-parity code and its probability formulas
protocol  the two-party commitment protocol
attacks   early measurement, delayed choice, parity flip
"""

__version__ = "0.1.0"
