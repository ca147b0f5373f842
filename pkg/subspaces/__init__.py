# Subspaces package
