"""Statistical kernels: pure functions from data to results.

Nothing in here knows about sessions, scripts, or the web layer.
"""
