"""
Command Line Tests
"""
