"""Symbolic-numeric workbench for Abelian integrals on hyperelliptic level curves.

The package constructs the Petrov normal form of polynomial 1-forms, the
Picard-Fuchs system of a hyperelliptic Hamiltonian, numeric period matrices
with branch tracking, and the Wronskian-based flatness certificates that
bound the multiplicity of the integrals.
"""

__version__ = "0.1.0"
