"""
API Tests

Endpoint, validation and error-mapping tests over TestClient.
"""
