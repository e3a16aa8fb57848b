"""Independent reference values for the unit tests.

Run with python3; the printed numbers are frozen into tests/*.cpp.
"""

import math

import numpy as np


def adagradpp(x0, grads_of, eps, c=1.0, delta=0.0, steps=1):
    x0 = np.asarray(x0, dtype=float)
    x = x0.copy()
    d = x.size
    eta = eps
    acc = np.zeros(d)
    etas = []
    for t in range(steps):
        g = grads_of(x, t)
        eta = max(eta, c * np.linalg.norm(x - x0) / math.sqrt(d))
        etas.append(eta)
        acc += g * g
        s = np.sqrt(acc)
        x = x - eta * g / (delta + s)
    return x, etas


def adampp(x0, grads_of, eps, case, beta1=0.9, beta2=0.999, lam=1.0, c=1.0, delta=1e-8, steps=1, amsgrad=True):
    x0 = np.asarray(x0, dtype=float)
    x = x0.copy()
    d = x.size
    eta = eps
    m = np.zeros(d)
    v = np.zeros(d)
    vmax = np.zeros(d)
    acc = np.zeros(d)
    for t in range(steps):
        g = grads_of(x, t)
        eta = max(eta, c * np.linalg.norm(x - x0) / math.sqrt(d))
        b1 = beta1 * lam**t
        m = b1 * m + (1 - b1) * g
        if case == 1:
            acc += g * g
            s = np.sqrt(acc)
        else:
            v = beta2 * v + (1 - beta2) * g * g
            vmax = np.maximum(vmax, v) if amsgrad else v
            s = np.sqrt((t + 1) * vmax)
        x = x - eta * m / (delta + s)
    return x


A = np.array([1.0, 2.0, 3.0, 0.5])
B = np.array([1.0, -1.0, 0.5, 2.0])
X0 = [0.3, -0.2, 0.1, 0.0]


def quad_grad(x, t):
    return A * x - B


def show(name, v):
    if np.ndim(v) == 0:
        print(f"{name} = {float(v):.17g}")
    else:
        print(f"{name} = {{" + ", ".join(f"{float(e):.17g}" for e in v) + "}")


def main():
    show("adagradpp_1d_x1", adagradpp([0.0], lambda x, t: np.array([2.0]), 1.0)[0])
    show("adagradpp_1d_x2", adagradpp([0.0], lambda x, t: np.array([2.0]), 1.0, steps=2)[0])
    x, etas = adagradpp([0.0, 0.0], lambda x, t: np.array([3.0, 4.0]) if t == 0 else np.zeros(2), 0.5, steps=2)
    show("adagradpp_2d_x1", x)
    show("adagradpp_2d_eta1", etas[1])
    show("adampp_case2_x1", adampp([0.0], lambda x, t: np.array([2.0]), 1.0, 2, beta1=0.0, beta2=0.5, delta=0.0))

    show("update_eta_c1", max(0.1, math.hypot(3, 4) / math.sqrt(2)))
    show("update_eta_c05", max(0.1, 0.5 * math.hypot(3, 4) / math.sqrt(2)))

    show("quad_adagradpp_25", adagradpp(X0, quad_grad, 0.01, delta=1e-8, steps=25)[0])
    show("quad_adampp_case1_25", adampp(X0, quad_grad, 0.01, 1, lam=0.99, steps=25))
    show("quad_adampp_case2_25", adampp(X0, quad_grad, 0.01, 2, steps=25))
    show("quad_adampp_case2_simplified_25", adampp(X0, quad_grad, 0.01, 2, steps=25, amsgrad=False))

    show("theta_t1_d1", math.log(60 * math.log(6) / 1.0))
    show("theta_t1_d01", math.log(60 * math.log(6) / 0.1))
    show("theta_t1000_d01", math.log(60 * math.log(6000) / 0.1))

    ts = np.array([1e2, 1e3, 1e4])
    gaps = 3 * ts**-0.8
    slope, intercept = np.polyfit(np.log(ts), np.log(gaps), 1)
    show("rate_slope", slope)
    show("rate_intercept", intercept)

    show("cosine_T11_t5", 0.5 * (1 + math.cos(math.pi * 5 / 10)))
    show("cosine_T11_t2_floor01", 0.1 + 0.9 * 0.5 * (1 + math.cos(math.pi * 2 / 10)))

    Aq = np.diag([1.0, 2.0])
    bq = np.array([1.0, 2.0])
    xs = np.linalg.solve(Aq, bq)
    show("diag_xstar", xs)
    show("diag_fstar", 0.5 * xs @ Aq @ xs - bq @ xs)

    w = np.array([0.5, -1.0])
    Xl = np.array([[1.0, 2.0], [-1.0, 0.5], [0.3, -0.7]])
    yl = np.array([1.0, -1.0, 1.0])
    z = yl * (Xl @ w)
    show("logistic_loss_reg01", np.mean(np.log1p(np.exp(-z))) + 0.05 * (w @ w))


if __name__ == "__main__":
    main()
