# Test package for the migrativity verifier.
