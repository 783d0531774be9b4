# test_experiments package
