"""Domain tests"""
