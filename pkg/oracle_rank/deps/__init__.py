# Exceptions and shared helpers
