from lindbladcraft.reporting.plots import plot_angle_yield, plot_comparison, plot_errors, plot_populations

__all__ = ("plot_angle_yield", "plot_comparison", "plot_errors", "plot_populations")
