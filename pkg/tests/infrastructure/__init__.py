"""Infrastructure tests"""
