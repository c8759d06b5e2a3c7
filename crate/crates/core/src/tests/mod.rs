//! Cross-module oracle and property suites.
