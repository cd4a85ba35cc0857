"""
Dimple Trap - Test Suite
"""
