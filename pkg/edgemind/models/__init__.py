"""Data models for traces, clustering, forecasting and routes."""
