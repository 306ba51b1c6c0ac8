# pages/tabs/curves_tab.py

from dash import html, dcc, dash_table, Input, Output
import dash_bootstrap_components as dbc
from utils.results_loader import load_run, table_payload
from utils.errors import QSNNError

curves_tab_layout = html.Div(className="py-4", children=[
    dbc.Row([
        dbc.Col([
            html.Label("Select Group"),
            dcc.Dropdown(id="curves-group-dropdown", placeholder="Default: All", multi=True)
        ], width=4)
    ]),
    html.Br(),
    dbc.Alert(id="curves-notify", color="danger", is_open=False),
    dash_table.DataTable(id="curves-table", page_size=50, sort_action="native",
                         style_table={"overflowX": "auto"})
])

def curve_rows(run_dir, groups=None):
    """Aggregate (per group, per iteration) rows, optionally filtered to some groups."""
    aggregate = load_run(run_dir)["tables"].get("aggregate")
    if aggregate is None:
        return [], [], []
    options = sorted(aggregate["group"].astype(str).unique())
    if groups and "All" not in groups:
        aggregate = aggregate[aggregate["group"].astype(str).isin(groups)]
    data, columns = table_payload(aggregate)
    return data, columns, ["All"] + options

def register_callbacks(app):
    @app.callback(
        Output("curves-table", "data"),
        Output("curves-table", "columns"),
        Output("curves-group-dropdown", "options"),
        Output("curves-notify", "children"),
        Output("curves-notify", "is_open"),
        Input("run_option", "value"),
        Input("curves-group-dropdown", "value")
    )
    def update_curves(run_dir, groups):
        if not run_dir:
            return [], [], [], "", False
        try:
            data, columns, options = curve_rows(run_dir, groups)
        except QSNNError as e:
            return [], [], [], str(e), True
        return data, columns, options, "", False
