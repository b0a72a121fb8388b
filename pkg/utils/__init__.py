# Utilities package for RandCF
# Contains helper modules for caching and CLI error handling
