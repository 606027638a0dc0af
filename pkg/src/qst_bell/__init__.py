"""qst-bell - Quantum state targeting on entangled qudits and the Bell inequality it yields."""

__version__ = "0.1.0"
