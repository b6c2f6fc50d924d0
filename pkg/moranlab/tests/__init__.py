"""
Test suite for moranlab
"""
