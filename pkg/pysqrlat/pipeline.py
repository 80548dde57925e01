# coding=utf-8
import logging
import threading

from fysom import Fysom

from .common import SqrlatError

log = logging.getLogger(__name__)


class PipelineBase(object):
    """Build-then-verify run with an observable state machine.

    Subclasses implement ``build()`` returning the constructed object and
    ``verify(result)`` returning a report dict with a boolean ``passed``.
    """

    def __init__(self, debuglevel=0, debugname='Pipeline'):
        self.debuglevel = debuglevel
        self.debugname = debugname
        self._error_string = ''
        self.on_error_string_changed = []
        self.result = None
        self.report = {}
        self.exception = None
        self._thread = None
        self.finished_condition = threading.Condition(threading.Lock())

        # callbacks
        self.on_state_changed = []

        # fsm
        self._fsm = Fysom(
            {
                'initial': 'down',
                'events': [
                    {'name': 'start', 'src': 'down', 'dst': 'building'},
                    {'name': 'built', 'src': 'building', 'dst': 'verifying'},
                    {'name': 'fail', 'src': 'building', 'dst': 'failed'},
                    {'name': 'passed', 'src': 'verifying', 'dst': 'verified'},
                    {'name': 'fail', 'src': 'verifying', 'dst': 'failed'},
                    {'name': 'reset', 'src': 'verified', 'dst': 'down'},
                    {'name': 'reset', 'src': 'failed', 'dst': 'down'},
                ],
            }
        )

        self._fsm.ondown = self._on_fsm_down
        self._fsm.onafterstart = self._on_fsm_start
        self._fsm.onbuilding = self._on_fsm_building
        self._fsm.onverifying = self._on_fsm_verifying
        self._fsm.onverified = self._on_fsm_verified
        self._fsm.onfailed = self._on_fsm_failed
        self._fsm.onafterreset = self._on_fsm_reset

    def _debug(self, text):
        if self.debuglevel > 0:
            log.debug('[%s]: %s', self.debugname, text)

    def _on_fsm_down(self, _):
        self._debug('state DOWN')
        for cb in self.on_state_changed:
            cb('down')
        return True

    def _on_fsm_start(self, _):
        self._debug('event START')
        return True

    def _on_fsm_building(self, _):
        self._debug('state BUILDING')
        for cb in self.on_state_changed:
            cb('building')
        return True

    def _on_fsm_verifying(self, _):
        self._debug('state VERIFYING')
        for cb in self.on_state_changed:
            cb('verifying')
        return True

    def _on_fsm_verified(self, _):
        self._debug('state VERIFIED')
        self._notify_finished()
        for cb in self.on_state_changed:
            cb('verified')
        return True

    def _on_fsm_failed(self, _):
        self._debug('state FAILED')
        self._notify_finished()
        for cb in self.on_state_changed:
            cb('failed')
        return True

    def _on_fsm_reset(self, _):
        self._debug('event RESET')
        self.result = None
        self.report = {}
        self.exception = None
        self.error_string = ''
        return True

    def _notify_finished(self):
        with self.finished_condition:
            self.finished_condition.notify_all()

    @property
    def state(self):
        return self._fsm.current

    @property
    def finished(self):
        return self._fsm.current in ('verified', 'failed')

    @property
    def error_string(self):
        return self._error_string

    @error_string.setter
    def error_string(self, string):
        if self._error_string is string:
            return
        self._error_string = string
        for cb in self.on_error_string_changed:
            cb(string)

    def build(self):
        raise NotImplementedError('build is not implemented')

    def verify(self, result):
        raise NotImplementedError('verify is not implemented')

    def start(self, threaded=False):
        if self._fsm.current != 'down':
            raise RuntimeError('pipeline %s is already running' % self.debugname)
        if threaded:
            self._thread = threading.Thread(target=self._run)
            self._thread.daemon = True
            self._thread.start()
        else:
            self._run()

    def run(self):
        """Run synchronously and return the report; re-raises build errors."""
        self.start()
        if self.exception is not None:
            raise self.exception
        return self.report

    def wait_finished(self, timeout=None):
        with self.finished_condition:
            if self.finished:
                return True
            self.finished_condition.wait(timeout=timeout)
            return self.finished

    def reset(self):
        if self._thread is not None:
            self._thread.join()
            self._thread = None
        self._fsm.reset()

    def _run(self):
        self._fsm.start()
        try:
            self.result = self.build()
        except SqrlatError as e:
            self.exception = e
            self.error_string = str(e)
            self._fsm.fail()
            return
        self._fsm.built()
        try:
            self.report = self.verify(self.result)
        except SqrlatError as e:
            self.exception = e
            self.error_string = str(e)
            self._fsm.fail()
            return
        if self.report.get('passed', False):
            self._fsm.passed()
        else:
            self.error_string = 'verification failed'
            self._fsm.fail()
