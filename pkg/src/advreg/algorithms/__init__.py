"""Training algorithms: adversarial regression and the OLS baseline."""
