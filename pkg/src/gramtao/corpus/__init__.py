"""Reference and faulty systems under test, runnable as standalone scripts."""
