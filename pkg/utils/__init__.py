"""
Dimple Trap - Utilities
"""
