//! Holds the `acceptance` test target. It lives in its own package so that it
//! runs after the unit, property and CLI suites in a workspace test run.
