"""
Dependency Injection
Single Responsibility: Provide dependency instances
"""
from gridtally.services.oracle_service import BruteForceOracle
from gridtally.services.transfer.transfer_service import TransferService
from gridtally.services.bounds.bounds_service import BoundsService
from gridtally.utilities.report_formatter import ReportFormatter

# Service singletons (created once, reused)
_oracle = None
_transfer_service = None
_bounds_service = None
_report_formatter = None

def get_oracle() -> BruteForceOracle:
    """Get or create BruteForceOracle instance."""
    global _oracle
    if _oracle is None:
        _oracle = BruteForceOracle()
    return _oracle

def get_transfer_service() -> TransferService:
    """Get or create TransferService instance."""
    global _transfer_service
    if _transfer_service is None:
        _transfer_service = TransferService()
    return _transfer_service

def get_bounds_service() -> BoundsService:
    """Get or create BoundsService instance."""
    global _bounds_service
    if _bounds_service is None:
        # Share automata with the counting commands
        _bounds_service = BoundsService(transfer_service=get_transfer_service())
    return _bounds_service

def get_report_formatter() -> ReportFormatter:
    """Get or create ReportFormatter instance."""
    global _report_formatter
    if _report_formatter is None:
        _report_formatter = ReportFormatter()
    return _report_formatter

def reset():
    """Drop every singleton (tests and repeated CLI runs in one process)."""
    global _oracle, _transfer_service, _bounds_service, _report_formatter
    _oracle = None
    _transfer_service = None
    _bounds_service = None
    _report_formatter = None
