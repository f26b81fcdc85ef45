"""
Gridtally Tests
"""
