# Verification package
