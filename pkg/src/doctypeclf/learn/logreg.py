"""L2-regularized logistic regression trained by batch gradient descent."""

import numpy as np


def sigmoid(z):
    return np.exp(-np.logaddexp(0.0, -z))


def loss_and_grad(w, b, X, y, l2=0.0):
    """Mean cross-entropy plus ``0.5 * l2 * ||w||^2`` (bias unpenalized).

    Returns ``(loss, grad_w, grad_b)``; labels are 0/1.
    """
    z = X @ w + b
    # log(1 + e^z) - y z, written stably
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * np.dot(w, w)
    err = sigmoid(z) - y
    grad_w = X.T @ err / len(y) + l2 * w
    grad_b = float(np.mean(err))
    return float(loss), grad_w, grad_b


def fit(X, y, learning_rate=0.1, l2=0.0, epochs=200):
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(epochs):
        _, gw, gb = loss_and_grad(w, b, X, y, l2)
        w -= learning_rate * gw
        b -= learning_rate * gb
    return w, b


def predict_proba(w, b, X):
    return sigmoid(np.atleast_2d(X) @ np.asarray(w) + b)
