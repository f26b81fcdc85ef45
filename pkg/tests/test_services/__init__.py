"""
Services Tests
"""
