"""
behaviorprint command modules
"""
