# Package marker for the check suites.
