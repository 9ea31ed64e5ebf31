class ExperimentPresets:
    """Centralized default parameters for every experiment kind."""

    # Values shared by all experiments unless a kind overrides them
    SHARED_DEFAULTS = {
        'alpha': 0.05,
        'u_max': 6.0,
        'beta': 0.5,
        'amplitude': 4.0,
        'refine': 20,
        'max_iters': 50,
        'dJ_tol': 1e-8,
        'grid_points': 241,
        'refine_iters': 40,
        'scheme': 'contact_lgvi',
    }

    EXPERIMENT_CONFIGS = {
        'simulate': {
            'T': 10.0,
            'dt': 0.01,
            'gamma': 1.0,
            'scheme': 'contact_lgvi',
        },
        # short-horizon accuracy
        'compare': {
            'T': 10.0,
            'dt': 0.01,
            'gamma': 1.0,
        },
        # long-horizon stability, strong damping
        'longhorizon': {
            'T': 100.0,
            'dt': 0.01,
            'gamma': 10.0,
        },
        'optimize': {
            'T': 3.0,
            'dt': 0.01,
            'gamma': 1.0,
            'alpha': 0.05,
            'u_max': 6.0,
            'beta': 0.5,
        },
        'convergence': {
            'T': 1.0,
            'dt': 0.01,
            'gamma': 1.0,
            'dts': [0.02, 0.01, 0.005],
            'refine': 100,
        },
    }

    # Font sizes for the PDF summary report
    REPORT_FONT_SIZES = {
        'small': {'title': 14, 'heading': 11, 'body': 9, 'table': 8, 'footer': 7},
        'medium': {'title': 16, 'heading': 12, 'body': 10, 'table': 9, 'footer': 8},
    }

    @classmethod
    def kinds(cls):
        return list(cls.EXPERIMENT_CONFIGS.keys())

    @classmethod
    def get_defaults(cls, kind):
        """Get the resolved default parameters of an experiment kind."""
        if kind not in cls.EXPERIMENT_CONFIGS:
            raise ValueError(f"Invalid experiment kind: {kind}. "
                             f"Available options: {', '.join(cls.EXPERIMENT_CONFIGS.keys())}")
        defaults = dict(cls.SHARED_DEFAULTS)
        defaults.update(cls.EXPERIMENT_CONFIGS[kind])
        defaults.setdefault('dts', [defaults['dt']])
        defaults['dts'] = list(defaults['dts'])
        defaults['out'] = f"Generated_Results/{kind}"
        return defaults

    @classmethod
    def get_report_font_sizes(cls, size_config='medium'):
        if size_config not in cls.REPORT_FONT_SIZES:
            raise ValueError(f"Invalid font size configuration: {size_config}. "
                             f"Available options: {', '.join(cls.REPORT_FONT_SIZES.keys())}")
        return cls.REPORT_FONT_SIZES[size_config]
