"""Fractional de la Vallee Poussin inequalities: operators, bounds and zero-free radii"""

__version__ = "0.1.0"
