# Test package for tardylab
