# Systems package
