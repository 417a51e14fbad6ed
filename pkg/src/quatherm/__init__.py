"""Quaternion polynomials, divided differences over spherical chains and Hermite interpolation."""
