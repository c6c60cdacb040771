"""__version__ is rewritten by the release tooling. Don't touch this file"""
__version__ = '0.1.0'
