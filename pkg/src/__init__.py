"""
chainwave: spectra and boundary-feedback dynamics of string/beam chains
"""
__version__ = "0.4.0"
