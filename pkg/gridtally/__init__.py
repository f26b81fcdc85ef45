"""
Grid Domination Counting Toolkit
"""
__version__ = "1.0.0"
