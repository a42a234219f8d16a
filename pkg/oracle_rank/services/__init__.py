# Evaluation services
