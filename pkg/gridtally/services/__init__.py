"""
Business Logic Layer - Services
"""
from gridtally.services.oracle_service import BruteForceOracle
from gridtally.services.transfer.transfer_service import TransferService
from gridtally.services.bounds.bounds_service import BoundsService, GrowthReport

__all__ = [
    "BruteForceOracle",
    "TransferService",
    "BoundsService",
    "GrowthReport"
]
