"""Toolkit for compiling and costing programs on active-volume
surface-code architectures: logical block networks, closed-form
operation costs, distillation error models, cycle-level scheduling
with quickswap routing, and device-level runtime estimates."""

__version__ = "0.1.0"
