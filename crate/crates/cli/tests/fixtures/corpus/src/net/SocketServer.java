package net;

import java.net.ServerSocket;

/** Accepts client connections on a port. */
public class SocketServer {
    private ServerSocket listener;

    public void accept(int port) throws Exception {
        listener = new ServerSocket(port);
        // each client connection gets its own session and packet stream
        handleClient(listener.accept());
    }

    private void handleClient(Object connection) {}
}
