"""
behaviorprint - behavioral fingerprints from learning-activity logs
Sequential pattern mining, split-half identifiability and Ward clustering
"""

__version__ = "1.0.0"
