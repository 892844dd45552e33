"""Application tests"""
